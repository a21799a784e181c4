"""
Celery Worker 模块
"""

