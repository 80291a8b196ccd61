from .waiting import LearnerState, wait_zero, wait_threshold, rm_step_size, rm_update
from .ThresholdSolver import ThresholdSolution, solve_optimal_threshold
from .ThresholdSolver import truncated_moments, threshold_equation, ratio_objective
from .ThresholdSolver import grid_search_threshold, cross_check_threshold
from .Policy import WaitingPolicy, ZeroWaitPolicy, FixedThresholdPolicy
from .Policy import OraclePolicy, OnlinePolicy, OnlineKSPolicy
from .Policy import make_policy, policy_label, POLICY_NAMES
