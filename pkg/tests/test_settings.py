#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""配置加载测试"""

import pytest

from config.settings import Settings, load_settings


def test_defaults():
    s = Settings()
    assert s.iter_cap == 1_000_000
    assert s.max_workers >= 1
    assert s.log_level == "INFO"


def test_environment_overrides(monkeypatch, fresh_settings):
    monkeypatch.setenv('RESILCHK_ITER_CAP', '42')
    monkeypatch.setenv('RESILCHK_LOG_FILE', 'yes')
    s = fresh_settings()
    assert s.iter_cap == 42
    assert s.log_file is True


def test_yaml_file_then_environment(tmp_path, monkeypatch):
    path = tmp_path / "resilchk.yaml"
    path.write_text("state_cap: 500\nseed: 9\n", encoding='utf-8')
    monkeypatch.setenv('RESILCHK_SEED', '11')
    s = load_settings(str(path))
    assert s.state_cap == 500
    assert s.seed == 11


def test_invalid_value(monkeypatch):
    monkeypatch.setenv('RESILCHK_MAX_WORKERS', '0')
    with pytest.raises(ValueError):
        load_settings()


def test_merged_ignores_missing_overrides():
    s = Settings(seed=5)
    merged = s.merged(seed=None, max_workers=2)
    assert merged.seed == 5
    assert merged.max_workers == 2
    assert s.max_workers == Settings().max_workers
