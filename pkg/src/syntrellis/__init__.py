"""Syndrome-trellis guided decoding of raw-read probability matrices.

Library layout:

* :mod:`syntrellis.codebook` -- convolutional code definitions, encoding,
  markers, offset scrambling, config files
* :mod:`syntrellis.trellis` -- binary/quaternary/marker-augmented syndrome
  trellises
* :mod:`syntrellis.channelsim` -- synthetic CTC / k-mer probability-matrix
  channel
* :mod:`syntrellis.primerseek` -- primer localisation by restricted beam search
* :mod:`syntrellis.synde` -- trellis-constrained beam-search decoder
* :mod:`syntrellis.oracle` -- exhaustive references for desk-scale verification
* :mod:`syntrellis.harness` -- batch experiments, FER/discard curves,
  complexity reports
"""

__version__ = "0.1.0"
