"""Backjump lab application package"""
