"""Elliptic-curve additively homomorphic encryption, Blind-and-Permute, and
privacy-preserving profile matching."""
from .bgn import PlaintextWindow
from .bp import BpConfig, Permutation, ShareVector, additive_split, bp_full_run, bp_half_run
from .backends import BgnBackend, PaillierBackend, generate_backend
from .matching import PrivacyLevel, Profile, best_match, intersection_cardinality, run_session

__version__ = "0.1.0"
