class ConfigurationError(ValueError):
    """Raised when mechanism, design or experiment parameters are inconsistent"""
