#!/usr/bin/env python3
"""Fixed-answer classifier speaking the external-command line protocol.

Started as: echo_classifier.py <model_path>. The model path is read as a
text file of "label<TAB>score" lines; every image gets that same answer.
Falls back to a bird/not-bird pair when the model file does not exist.
"""
import os
import sys


def main():
    answer = "bird\t0.73\nnot bird\t0.27\n"
    if len(sys.argv) > 1 and os.path.isfile(sys.argv[1]):
        with open(sys.argv[1]) as f:
            answer = f.read()
        if not answer.endswith("\n"):
            answer += "\n"

    for line in sys.stdin:
        if not line.strip():
            continue
        sys.stdout.write(answer)
        sys.stdout.write("\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
