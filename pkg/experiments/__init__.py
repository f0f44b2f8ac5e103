"""Runnable verifications, each a setup()/construct() pair producing a VerificationReport."""
