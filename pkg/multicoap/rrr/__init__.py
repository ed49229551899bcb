from .rrr import RankSelection, reduced_rank_beta, select_rank
