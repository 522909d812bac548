"""CKD risk prediction for T2DM claims cohorts, with prototype, attribution,
and guideline-backed contextualization of the predictions."""

__version__ = "0.1.0"
