"""五角参数化的两比特量子实现、局部多起点搜索与效率二分"""
