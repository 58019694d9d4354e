"""Partisan social-bot analysis over retweet networks."""

__version__ = "0.1.0"
