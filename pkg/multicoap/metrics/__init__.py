from .trace import ScoreReport, beta_error, score, trace_statistic
