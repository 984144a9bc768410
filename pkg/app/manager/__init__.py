"""管理器包

这里只导出设置管理器：计算模块都依赖它，研究管理器需从 app.manager.study_manager 显式导入。
"""

from .settings_manager import settings_manager

__all__ = ["settings_manager"]
