"""(2,2,2) 场景的 NPA 矩量矩阵结构、线性泛函与嵌套 SDP 二分"""
