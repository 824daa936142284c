"""Figure rendering for sweep curves and refinement tables."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def plot_sweep(curve, path, title=None):
    """Error against exponent at fixed mesh (log-log)."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(curve.p_values, curve.errors, "o-", color="tab:blue")
    i = min(range(len(curve.errors)), key=curve.errors.__getitem__)
    ax.loglog([curve.p_values[i]], [curve.errors[i]], "s", color="tab:red",
              label="p* = %g" % curve.p_values[i])
    ax.set_xlabel("p")
    ax.set_ylabel(r"$L^\infty$ error")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_table(rows, path, title=None):
    """Best error against mesh size with first/second-order guides."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    hs = [r.h for r in rows]
    errs = [r.best_error for r in rows]
    ax.loglog(hs, errs, "o-", color="tab:blue", label="best error")
    for order, style in ((1, "--"), (2, ":")):
        ref = [errs[0] * (h / hs[0]) ** order for h in hs]
        ax.loglog(hs, ref, style, color="gray", label="order %d" % order)
    ax.set_xlabel("h")
    ax.set_ylabel(r"$\inf_p$ $L^\infty$ error")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    ax.invert_xaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
