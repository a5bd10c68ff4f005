"""Corpus module"""
