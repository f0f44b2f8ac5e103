"""Domain objects: deck groups, fundamental domains, model spaces, kernels and sections."""
