"""Terms module"""
