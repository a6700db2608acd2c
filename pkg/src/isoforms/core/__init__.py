from .config import AppSettings, PortraitConfiguration, get_app_settings
from .logging import setup_logging

__all__ = ["setup_logging", "get_app_settings", "AppSettings", "PortraitConfiguration"]
