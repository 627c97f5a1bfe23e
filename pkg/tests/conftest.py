#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试公共夹具

提供案例模型、固定种子的随机数发生器，以及静默库日志。
"""

import random

import pytest

from config.settings import reload_settings
from src.services.casestudies import (
    replicated_server_model, sidechannel_model, transmission_model,
)
from src.services.parser import parse_model
from src.utils.logger import Logger


@pytest.fixture(autouse=True)
def quiet_logs():
    Logger.disable("src")
    yield
    Logger.enable("src")


@pytest.fixture
def fresh_settings(monkeypatch):
    """在 monkeypatch 的环境变量下重新加载配置，结束后恢复"""
    yield lambda: reload_settings()
    monkeypatch.undo()
    reload_settings()


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def tiny_model():
    return parse_model("""
domain { 0..1, v }
channel a, b, d1
location l1, l2
def OTP = a!v.0
def BC(i) = a?(x).d1!x.0
system Sys1 = new a . (BC(1) | OTP)
system Pair = a!(1).0 | a?(x).b!(x).0
context Twice = loc l1 [ []_1 ] | loc l2 [ []_2 ]
""")


@pytest.fixture(scope="session")
def sidechannel():
    return sidechannel_model(3, 5, nested=True)


@pytest.fixture(scope="session")
def repserver():
    return replicated_server_model(2, 2, 1)


@pytest.fixture(scope="session")
def repserver_two_failures():
    return replicated_server_model(2, 2, 2)


@pytest.fixture(scope="session")
def transmission():
    return transmission_model(2, 2)
