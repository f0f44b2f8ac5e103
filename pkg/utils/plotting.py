import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from utils.styles import domain_outline_style, get_spectral_colors, spectral_cmap


def add_domain_outline(ax, domain, samples=64, style=domain_outline_style):
    boundary = domain.boundary(samples)
    ax.plot(boundary.real, boundary.imag, **style)
    return ax


def get_default_domain_axes(
    domain,
    figsize=(6, 6),
    margin=0.05,
    disc_circle=False,
):
    fig, ax = plt.subplots(figsize=figsize)
    boundary = domain.boundary()
    lo = min(boundary.real.min(), boundary.imag.min()) - margin
    hi = max(boundary.real.max(), boundary.imag.max()) + margin
    if disc_circle:
        # Ideal boundary of the disc model
        angle = np.linspace(0, 2 * np.pi, 361)
        ax.plot(np.cos(angle), np.sin(angle), color="#888888", linewidth=0.8)
        lo, hi = -1.02, 1.02
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    return fig, ax


def plot_kernel_grid(points, norms, domain, path, title="", disc_circle=False):
    """Heat map of a pointwise norm sampled on a square grid, with the domain outline on top"""
    fig, ax = get_default_domain_axes(domain, disc_circle=disc_circle)
    mesh = ax.pcolormesh(points.real, points.imag, norms, cmap=spectral_cmap, shading="auto")
    fig.colorbar(mesh, ax=ax, shrink=0.8, label="pointwise norm")
    add_domain_outline(ax, domain)
    ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_group_growth(stats, path, title=""):
    """Ball counts against radius with the fitted a e^{bR} bound"""
    fig, ax = plt.subplots(figsize=(6, 4))
    data_color, fit_color = get_spectral_colors(2, 0.1, 0.9)
    ax.semilogy(stats.radii, stats.counts, "o", color=data_color, label="enumerated")
    ax.semilogy(stats.radii, stats.count_bound(stats.radii), "-", color=fit_color,
                label=f"{stats.growth_a:.3g} exp({stats.growth_b:.3g} R)")
    ax.set_xlabel("radius R")
    ax.set_ylabel("#{g : d(x0, g x0) <= R}")
    ax.legend()
    ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
