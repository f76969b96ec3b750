"""稠密半定规划：问题描述、可插拔求解器与证书检查"""
from sdp.problem import DenseSdp, SdpSolution
from sdp.interior_point import InteriorPointSolver, solve_sdp, verify_solution
