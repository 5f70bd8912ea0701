from __future__ import unicode_literals


class ProblemRegistry(object):
    """
    A registry that keeps track of the problem builders that can be selected by name, from a configuration file
    or from the command line.
    """
    def __init__(self):
        self._registry = {}

    def register(self, name, builder=None, description=''):
        """
        Register a problem builder. A builder is any callable that takes keyword parameters and returns a
        :py:class:`rannlr.problem.ProblemInstance`.

        :param name: The name to select the builder by.
        :type name: str
        :param builder: The builder to register. Leave out to use this method as a decorator.
        :type builder: Callable
        :param description: A one-line description, shown by the command line.
        :type description: str
        """
        def registrar(fn):
            """Register the builder under the given name."""
            if not callable(fn):
                raise TypeError("Supplied problem builder is not callable.")

            self._registry[name] = {
                'builder': fn,
                'description': description or (fn.__doc__ or '').strip().split('\n')[0],
            }

            # Returned unchanged, so stacking the decorator is the same as
            # builder = registry.register('name')(builder)
            return fn

        if builder is None:
            return registrar
        return registrar(builder)

    def contains(self, name):
        """
        :return: Whether a builder is registered under the name.
        :rtype: bool
        """
        return name in self._registry

    def unregister(self, name):
        try:
            del self._registry[name]
        except KeyError:
            pass

    def get(self, name):
        try:
            return self._registry[name]['builder']
        except KeyError:
            raise KeyError("No problem registered under %r, choose from: %s" % (name, ', '.join(self.names())))

    def build(self, name, **params):
        return self.get(name)(**params)

    def names(self):
        return sorted(self._registry)

    def describe(self, name):
        return self._registry[name]['description']


problems = ProblemRegistry()
