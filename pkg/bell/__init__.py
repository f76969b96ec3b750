"""(2,2,2) 行为代数：概率、关联函数、不等式、无信号结构、局域确定点与探测噪声信道"""
