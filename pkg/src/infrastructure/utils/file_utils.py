# src/infrastructure/utils/file_utils.py
import csv
import json
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

from src.domain.exceptions.validation_exception import ModelFileError


class FileUtils:
    """文件工具类"""

    @staticmethod
    def ensure_dir(path: Union[str, Path]) -> Path:
        """确保目录存在"""
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def read_membership(path: Union[str, Path]) -> List[int]:
        """
        读取成员向量：JSON 整数数组，或每行一个整数 / 逗号分隔的文本
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8").strip()
        except OSError as e:
            raise ModelFileError(e.strerror or str(e), str(path)) from None
        if text.startswith("["):
            try:
                values = json.loads(text)
            except json.JSONDecodeError as e:
                raise ModelFileError(e.msg, str(path), e.lineno, e.colno) from None
        else:
            values = [tok for line in text.splitlines() for tok in line.replace(",", " ").split()]
        try:
            return [int(v) for v in values]
        except (TypeError, ValueError):
            raise ModelFileError("membership entries must be integers", str(path)) from None

    @staticmethod
    def append_csv_rows(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """追加 CSV 行；文件不存在或为空时先写表头"""
        path = Path(path)
        FileUtils.ensure_dir(path.parent)
        new_file = not path.exists() or path.stat().st_size == 0
        with open(path, "a", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            if new_file:
                writer.writerow(header)
            writer.writerows(rows)
        return path

    @staticmethod
    def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = Path(path)
        FileUtils.ensure_dir(path.parent)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
        return path
