"""
Report writers: JSON for machines, plain-text tables for people, and the
checkpoint profile as CSV and as an SVG line chart.
"""

import csv
import json
import logging

import matplotlib
from matplotlib.figure import Figure
from matplotlib.backends.backend_svg import FigureCanvasSVG

from ..util import atomic_write

log = logging.getLogger(__name__)

SHORT_NAMES = ('straight', 'L-change', 'L-turn', 'R-change', 'R-turn')


def _pct(value):
    return '   -  ' if value is None else '%6.1f' % (100.0 * value)


def to_json(obj):
    return json.dumps(obj.to_dict(), indent=2, sort_keys=True)


def write_json(path, obj):
    with atomic_write(path) as f:
        f.write(to_json(obj) + "\n")


def format_report(report):
    lines = [
        "%s, %s-time protocol, %d folds, seed %d, mask %s"
        % (report.model, report.protocol, report.k, report.seed,
           report.to_dict()['mask']),
        "",
        "  accuracy  %6.1f %%  (fold mean %.1f, sigma %.1f)"
        % (100 * report.accuracy, 100 * report.mean_accuracy,
           100 * report.std_accuracy),
        "  macro F1  %6.1f %%  (fold mean %.1f, sigma %.1f)"
        % (100 * report.metrics.macro_f1, 100 * report.mean_f1,
           100 * report.std_f1),
        "  chance    %6.1f %%" % (100 * report.chance),
        "  prior     %6.1f %%" % (100 * report.prior),
    ]
    if report.accuracy_drop is not None:
        lines.append("  drop      %6.1f points (zero-time minus varying-time "
                     "at 1 s)" % (100 * report.accuracy_drop))
    lines += ["", "  %-10s %8s %8s" % ('class', 'acc %', 'F1 %')]
    for name, acc, f1 in zip(SHORT_NAMES, report.metrics.per_class_accuracy,
                             report.metrics.per_class_f1):
        lines.append("  %-10s %8s %8s" % (name, _pct(acc), _pct(f1)))
    lines += ["", "  confusion (rows true, columns predicted)"]
    for name, row in zip(SHORT_NAMES, report.metrics.confusion):
        lines.append("  %-10s " % name + " ".join("%5d" % v for v in row))
    if report.checkpoint is not None:
        lines += ["", "  seconds before maneuver   accuracy %"]
        for seconds, acc in report.checkpoint.rows():
            lines.append("  %23d   %10s" % (seconds, _pct(acc)))
        lines.append("  mean TUM (%s)  %.2f s"
                     % (report.tum_rule, report.mean_tum))
    return "\n".join(lines)


def format_ablation(table):
    header = "  %-9s" % '' + "".join("%10s" % n for n in SHORT_NAMES) + \
        "%10s" % 'overall'
    lines = ["per-class accuracy %", header]
    for name, per_class, overall in table.rows():
        lines.append("  %-9s" % name +
                     "".join("%10s" % _pct(v) for v in per_class) +
                     "%10s" % _pct(overall))
    return "\n".join(lines)


def format_metrics(metrics):
    lines = ["accuracy %.1f %%, macro F1 %.1f %%"
             % (100 * metrics.accuracy, 100 * metrics.macro_f1)]
    for name, acc in zip(SHORT_NAMES, metrics.per_class_accuracy):
        lines.append("  %-10s %8s" % (name, _pct(acc)))
    return "\n".join(lines)


def write_checkpoint_csv(path, checkpoint):
    with atomic_write(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(['seconds_before', 'accuracy'])
        for seconds, acc in checkpoint.rows():
            writer.writerow([seconds, repr(float(acc))])


def write_profile_svg(path, checkpoint, title=None):
    """Accuracy against seconds before the maneuver, 5 s on the left."""
    rows = checkpoint.rows()
    fig = Figure(figsize=(5, 3.5))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(1, 1, 1)
    ax.plot([s for s, _ in rows], [100 * a for _, a in rows], marker='o')
    ax.set_xlim(5.5, 0.5)
    ax.set_ylim(0, 100)
    ax.set_xlabel('seconds before maneuver')
    ax.set_ylabel('accuracy [%]')
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    # fixed ids and no timestamp, so equal data gives equal bytes
    with matplotlib.rc_context({'svg.hashsalt': 'mfusion'}):
        with atomic_write(path, 'wb') as f:
            fig.savefig(f, format='svg', metadata={'Date': None})
    log.debug("wrote %s", path)
