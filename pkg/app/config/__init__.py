"""Config module"""
