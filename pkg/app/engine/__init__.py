"""Engine module"""
