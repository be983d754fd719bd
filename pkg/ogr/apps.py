from django.apps import AppConfig


class OgrConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ogr'
    verbose_name = 'Online gradient regression'
