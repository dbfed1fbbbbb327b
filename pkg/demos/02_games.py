"""
The same distance, as a game
============================

A challenger picks a transition, a defender answers it, and the answer costs
its label distance.
"""

# %%
import math

from wmts_quant import fixtures, modal_dist
from wmts_quant.games import discounted_value, game_modal_dist, reduce_to_game, replay

s, d = fixtures.determinization_pair()
g, start = reduce_to_game(s, d, lam=0.9)
print(len(g.v1), "challenger vertices,", len(g.v2), "defender vertices")
print(g.meta)

# %%
# One round is two moves, so the game discounts by sqrt(lambda) per move.
values, th1, th2 = discounted_value(g, g.meta["game_lambda"])
print(values[start] / math.sqrt(0.9), modal_dist(s, d)[0])

# %%
# The positional strategies reproduce the value when played against each other.
print(replay(g, start, th1, th2, g.meta["game_lambda"]) / math.sqrt(0.9))

# %%
# Or all in one call.
print(game_modal_dist(s, d)[0])
