"""
文件写入工具

先写临时文件再原子替换，避免中途失败留下半个文件
"""

import os
import random
import time
import logging

logger = logging.getLogger(__name__)


def atomic_write_text(path: str, text: str, encoding: str = "utf-8", max_retries: int = 3) -> None:
    """
    原子写入文本文件

    Args:
        path: 目标文件路径
        text: 文件内容
        encoding: 编码
        max_retries: 最大重试次数（指数退避）

    Raises:
        OSError: 重试后仍写入失败
    """
    retry_delay = 0.1  # 100ms
    directory = os.path.dirname(os.path.abspath(path))

    for attempt in range(max_retries):
        # 使用进程ID和随机数生成唯一的临时文件名（避免并发冲突）
        temp_file = f"{path}.tmp.{os.getpid()}.{random.randint(1000, 9999)}"
        try:
            os.makedirs(directory, exist_ok=True)

            # newline='' 保持调用方给出的换行符不被平台转换
            with open(temp_file, "w", encoding=encoding, newline="") as f:
                f.write(text)

            # 原子替换（os.replace 在所有平台上都支持原子覆盖）
            os.replace(temp_file, path)
            return

        except OSError as e:
            try:
                if os.path.exists(temp_file):
                    os.remove(temp_file)
            except OSError:
                pass

            if attempt == max_retries - 1:
                logger.error(f"❌ 写入文件失败（重试{max_retries}次后）: {path}: {e}")
                raise
            time.sleep(retry_delay)
            retry_delay *= 2  # 指数退避
