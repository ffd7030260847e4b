"""ROC curve plots rendered to SVG with matplotlib."""

import io

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

# Fixed salt and no date so equal inputs give equal bytes
SVG_STYLE = {
    'svg.hashsalt': 'fairfold',
    'svg.fonttype': 'none',
    'font.size': 10,
    'axes.titlesize': 12,
    'axes.labelsize': 11
}
TICKS = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]

def roc_svg(curves, title):
    """
    One standalone SVG document.

    `curves` is a sequence of (label, RocCurve) pairs, drawn in order
    over a dashed chance diagonal.
    """
    with plt.rc_context(SVG_STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        try:
            ax.plot([0, 1], [0, 1], linestyle='--', color='#999999', linewidth=1)
            for label, curve in curves:
                ax.plot(curve.fpr, curve.tpr, linewidth=1.5, label=str(label))

            ax.set_xlim(0, 1)
            ax.set_ylim(0, 1)
            ax.set_xticks(TICKS)
            ax.set_yticks(TICKS)
            ax.set_xlabel('False positive rate')
            ax.set_ylabel('True positive rate')
            ax.set_title(title)
            if curves:
                ax.legend(loc='lower right')
            fig.tight_layout()

            buffer = io.StringIO()
            fig.savefig(buffer, format='svg', metadata={'Date': None})
            return buffer.getvalue()
        finally:
            plt.close(fig)
