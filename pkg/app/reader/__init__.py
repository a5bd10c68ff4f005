"""Reader module"""
