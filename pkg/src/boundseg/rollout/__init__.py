"""Rollout bookkeeping: groups, selective replacement, advantages, simulation."""
