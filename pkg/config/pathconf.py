# -*- coding: utf-8 -*-

import os

"""
配置路径
"""

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# 数据目录----------------------------
DATA_DIR = os.path.join(BASE_DIR, "data")

# yaml测试用例数据路径（效率表格、NPA等式黄金文件）
CASE_YAML_DIR = os.path.join(DATA_DIR, "case_yaml")

# 行为（Behavior）JSON 样例
BEHAVIOR_DIR = os.path.join(DATA_DIR, "behaviors")

# 输出目录----------------------------
OUTPUT_DIR = os.path.join(BASE_DIR, "output")

# 日志路径
LOG_DIR = os.path.join(OUTPUT_DIR, "logs")

# 测试结果报告目录
PROPER_ALLURE_DIR = os.path.join(OUTPUT_DIR, "reports")
