from hypothesis import settings

# stable runs: property tests draw the same examples every time
settings.register_profile("repeatable", derandomize=True, deadline=None)
settings.load_profile("repeatable")
