from matplotlib import colormaps
from matplotlib.colors import to_hex
import numpy as np


spectral_cmap = colormaps.get_cmap("Spectral")

def get_spectral_color(alpha):
    return to_hex(spectral_cmap(alpha)[:3])


def get_spectral_colors(n_colors, lower_bound=0, upper_bound=1):
    return [
        get_spectral_color(alpha)
        for alpha in np.linspace(lower_bound, upper_bound, n_colors)
    ]


# Outline of a fundamental domain drawn over heat maps
domain_outline_style = dict(
    color="#222222",
    linewidth=1.2,
    alpha=0.9,
)
