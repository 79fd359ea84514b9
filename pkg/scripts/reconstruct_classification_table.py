"""Rebuild the per-speaker classification table from confusion matrices.

TP_k = round(recall_k * support_k); the remaining cells follow from the supports.
"""
from mispron.metrics import format_classification_table, report_from_confusion

CONFUSION = {  # rows = true class 0/1, cols = predicted 0/1
    "EBVS": [[64, 46], [40, 93]],
    "ERMS": [[72, 61], [52, 59]],
    "MBMPS": [[64, 90], [42, 49]],
    "NJS": [[78, 85], [45, 45]],
}

if __name__ == "__main__":
    for i, (speaker, cm) in enumerate(CONFUSION.items()):
        table = format_classification_table(report_from_confusion(cm), speaker).splitlines()
        print("\n".join(table if i == 0 else table[1:]))
