"""
ZakFrame Package Initialization
"""

__version__ = "1.0.0"
__author__ = "ZakFrame Team"
__description__ = "Zak transforms and Gabor frame bounds of Hermite windows"
