"""
Secure-channel utilities for slotted on-off-keyed molecular links.

This package contains modules responsible for the count-based channel,
the simultaneous-transmission key exchange, XOR block ciphering, energy
accounting and the end-to-end experiment harness.
"""
