import hypothesis

hypothesis.settings.register_profile(
    "deterministic", deadline=None, derandomize=True, max_examples=50
)
hypothesis.settings.load_profile("deterministic")
