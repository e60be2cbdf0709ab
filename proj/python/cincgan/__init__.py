# Copyright 2026 The CinCGAN-SE Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Cycle-in-cycle GAN speech enhancement."""

from ._cincgan import (
    FFT_SIZE,
    HOP,
    NUM_BINS,
    SAMPLE_RATE,
    CheckpointError,
    Enhancer,
    Error,
    InvalidInputError,
    InvalidParameterError,
    InvariantError,
    IoError,
    ShapeError,
    TrainingError,
    compress,
    decompress,
    istft,
    learning_rate,
    mix_at_snr,
    read_wav,
    run_cli,
    segsnr,
    stft,
    stoi,
    write_wav,
)

__version__ = "0.1.0"
