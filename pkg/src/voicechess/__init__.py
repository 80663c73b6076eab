"""Voice-command chess: audio front end, cepstral features, k-NN recognition,
a chess rules engine, speaker profiles, and a real-time HTTP service."""

__version__ = "0.1.0"
