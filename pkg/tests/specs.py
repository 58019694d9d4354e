"""Scenario specs shared by the scenario, pipeline and acceptance tests."""

from partisan_graph.scenario import ScenarioSpec

# row propensities with the bot rows taken from the published interaction matrix
BOT_ROW_PROPENSITY = {
    "LiberalHuman": {"LiberalHuman": 0.8, "LiberalBot": 0.16, "ConservativeHuman": 0.03, "ConservativeBot": 0.01},
    "ConservativeHuman": {"ConservativeHuman": 0.68, "ConservativeBot": 0.28, "LiberalHuman": 0.03, "LiberalBot": 0.01},
    "LiberalBot": {"LiberalHuman": 0.71, "LiberalBot": 0.22, "ConservativeHuman": 0.05, "ConservativeBot": 0.02},
    "ConservativeBot": {"ConservativeHuman": 0.52, "ConservativeBot": 0.43, "LiberalHuman": 0.03, "LiberalBot": 0.02},
}


def interaction_spec(rng_seed: int = 2018) -> ScenarioSpec:
    """Bot rows produce about 5,000 retweets each, 10,000 bot interactions in total."""
    return ScenarioSpec(
        sizes={"LiberalHuman": 800, "ConservativeHuman": 500, "LiberalBot": 250, "ConservativeBot": 250},
        activity={
            "LiberalHuman": {"original": 1.0, "retweet": 2.0, "reply": 0.0},
            "ConservativeHuman": {"original": 1.0, "retweet": 2.0, "reply": 0.0},
            "LiberalBot": {"original": 1.0, "retweet": 20.0, "reply": 0.0},
            "ConservativeBot": {"original": 1.0, "retweet": 20.0, "reply": 0.0},
        },
        propensity={k: dict(v) for k, v in BOT_ROW_PROPENSITY.items()},
        rng_seed=rng_seed,
    )


def rtp_spec(rtp: float = 0.25, rng_seed: int = 11) -> ScenarioSpec:
    """Both sides' humans send a share ``rtp`` of their retweets to same-side bots."""
    rest = 1.0 - rtp - 0.04
    return ScenarioSpec(
        sizes={"LiberalHuman": 600, "ConservativeHuman": 500, "LiberalBot": 120, "ConservativeBot": 100},
        activity={g: {"original": 1.5, "retweet": 6.0, "reply": 1.0} for g in
                  ("LiberalHuman", "ConservativeHuman", "LiberalBot", "ConservativeBot")},
        propensity={
            "LiberalHuman": {"LiberalHuman": rest, "LiberalBot": rtp, "ConservativeHuman": 0.03, "ConservativeBot": 0.01},
            "ConservativeHuman": {"ConservativeHuman": rest, "ConservativeBot": rtp, "LiberalHuman": 0.03, "LiberalBot": 0.01},
            "LiberalBot": {"LiberalHuman": 0.7, "LiberalBot": 0.25, "ConservativeHuman": 0.03, "ConservativeBot": 0.02},
            "ConservativeBot": {"ConservativeHuman": 0.6, "ConservativeBot": 0.35, "LiberalHuman": 0.03, "LiberalBot": 0.02},
        },
        n_unscored=20,
        rng_seed=rng_seed,
    )


def config_for(paths: dict, **overrides) -> "PipelineConfig":  # noqa: F821
    from partisan_graph.pipeline import PipelineConfig

    return PipelineConfig(
        corpus=[str(paths["corpus"])],
        scores=str(paths["scores"]),
        liberal_outlets=str(paths["liberal_outlets"]),
        conservative_outlets=str(paths["conservative_outlets"]),
        url_cache=str(paths["url_cache"]),
        **overrides,
    )
