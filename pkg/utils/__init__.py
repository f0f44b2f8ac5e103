"""Numerical routines and plumbing shared by the objects and experiments."""
