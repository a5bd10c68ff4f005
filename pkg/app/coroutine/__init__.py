"""Coroutine module"""
