"""Transform module"""
