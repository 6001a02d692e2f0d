"""Experiment config models."""
