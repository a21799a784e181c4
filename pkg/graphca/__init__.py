"""
graphca：标注图上的元胞自动机、MSO / FO 模型检验与两者之间的递归翻译
"""

__version__ = "1.0.0"
