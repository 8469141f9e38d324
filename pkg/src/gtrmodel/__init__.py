"""Tension-reduction model toolkit."""
