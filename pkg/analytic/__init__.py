"""闭式无信号下界 η_ns 与其命题链的数值验证"""
