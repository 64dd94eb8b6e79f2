"""Numeric audits of biwarped product submanifolds of flat Kaehler space."""
