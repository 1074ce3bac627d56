from hypothesis import HealthCheck, settings

# simulation-backed properties legitimately take tens of ms per example
settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")
