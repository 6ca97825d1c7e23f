"""Report figures rendered to files with the Agg backend."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 8,
    "axes.labelsize": 8,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "lines.linewidth": 1.0,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "image.cmap": "gray",
}
PST_COLOR = "tab:red"
REF_COLOR = "tab:blue"
# keeps PNG output byte-identical across runs
_SAVE_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_SAVE_META if str(path).endswith(".png") else None)
    plt.close(fig)
    return path


def oracle_figure(path, signal, numerical, analytic, u=None, phase=None):
    """Kernel phase, its derivative, the input and numerical vs closed-form output."""
    with plt.rc_context(STYLE):
        if u is None:
            fig, axes = plt.subplots(2, 1, figsize=(6, 4.5))
            ax_in, ax_out = axes
        else:
            fig, axes = plt.subplots(2, 2, figsize=(7.5, 5))
            (ax_phi, ax_dphi), (ax_in, ax_out) = axes
            order = np.argsort(u)
            us, ph = np.asarray(u)[order], np.asarray(phase)[order]
            ax_phi.plot(us, ph, color="k")
            ax_phi.set(xlabel="frequency (cycles/sample)", ylabel="phase (rad)", title="Phase kernel")
            ax_dphi.plot(us, np.gradient(ph, us), color="k")
            ax_dphi.set(xlabel="frequency (cycles/sample)", ylabel="d phase / du",
                        title="Phase derivative")
        ax_in.plot(signal, color="k")
        ax_in.set(xlabel="sample", ylabel="brightness", title="Input")
        ax_out.plot(numerical, color=PST_COLOR, label="numerical")
        ax_out.plot(analytic, color=REF_COLOR, linestyle=":", label="closed form")
        ax_out.set(xlabel="sample", ylabel="phase (rad)", title="Output")
        ax_out.legend(loc="best")
        return _save(fig, path)


def sweep_figure(path, signal, pst, derivative):
    """Input staircase and PST vs derivative responses on twin axes."""
    with plt.rc_context(STYLE):
        fig, (ax_in, ax_out) = plt.subplots(2, 1, figsize=(6, 4.5), sharex=True)
        ax_in.plot(signal, color="k")
        ax_in.set(ylabel="brightness", title="Input")
        ax_out.plot(pst, color=PST_COLOR, label="PST")
        ax_out.set(xlabel="sample", ylabel="PST (rad)")
        ax_d = ax_out.twinx()
        ax_d.plot(derivative, color=REF_COLOR, linestyle=":", label="derivative")
        ax_d.set_ylabel("derivative")
        lines = ax_out.get_lines() + ax_d.get_lines()
        ax_out.legend(lines, [ln.get_label() for ln in lines], loc="upper right")
        return _save(fig, path)


def line_scan_figure(path, scan, pst, derivative, row=None):
    title = "Input line scan" if row is None else f"Input line scan (row {row})"
    with plt.rc_context(STYLE):
        fig, (ax_in, ax_out) = plt.subplots(2, 1, figsize=(6, 4.5), sharex=True)
        ax_in.plot(scan, color="k")
        ax_in.set(ylabel="brightness", title=title)
        ax_out.plot(pst, color=PST_COLOR, label="PST (normalized)")
        ax_out.plot(derivative, color=REF_COLOR, label="derivative (normalized)")
        ax_out.set(xlabel="pixel", ylabel="response")
        ax_out.legend(loc="upper right")
        return _save(fig, path)


def maps_figure(path, image, maps):
    """The input image followed by one panel per feature map."""
    panels = [("Input", np.asarray(image))] + [(k, np.asarray(v)) for k, v in maps.items()]
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(panels), figsize=(2.6 * len(panels), 2.8))
        for ax, (title, data) in zip(np.atleast_1d(axes), panels):
            ax.imshow(data, interpolation="nearest")
            ax.set_title(title)
            ax.set_axis_off()
        return _save(fig, path)
