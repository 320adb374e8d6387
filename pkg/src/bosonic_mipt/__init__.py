"""Exact simulation of monitored bosonic circuits at fixed photon number."""
