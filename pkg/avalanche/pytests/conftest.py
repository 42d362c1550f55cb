from hypothesis import settings, HealthCheck

settings.register_profile(
    'avalanche',
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile('avalanche')
