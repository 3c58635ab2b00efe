class PluginInputError(ValueError):
    """A plug-in was handed payloads it cannot interpret."""
