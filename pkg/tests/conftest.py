import hypothesis

# Simulation-heavy properties can exceed the default 200 ms deadline.
hypothesis.settings.register_profile("sim", deadline=None, max_examples=60)
hypothesis.settings.load_profile("sim")
