"""Named seed matrices shared by the experiment scripts."""

from hadswitch.constructions import double, paley, sylvester

SEEDS = {
    "sylvester16": lambda: sylvester(4),
    "paley20": lambda: paley(19, 1),
    "double24": lambda: double(paley(11, 1), paley(11, 1)),
    "paley24": lambda: paley(23, 1),
    "paley2_28": lambda: paley(13, 2),
    "paley28": lambda: paley(27, 1),
    "double32": lambda: double(sylvester(4), sylvester(4)),
    "paley2_36": lambda: paley(17, 2),
}
